#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "text.hpp"

namespace credit {

/// Line-oriented record stream: each line is `key,field,field,...`.
/// Numbers are written in shortest round-trip form.
class RecordWriter {
public:
    void line(std::string_view key, const std::vector<std::string>& fields = {}) {
        text_ += key;
        for (const auto& f : fields) {
            text_ += ',';
            text_ += f;
        }
        text_ += '\n';
    }

    void numbers(std::string_view key, const std::vector<double>& values) {
        std::vector<std::string> fields;
        fields.reserve(values.size());
        for (double v : values)
            fields.push_back(format_double(v));
        line(key, fields);
    }

    const std::string& text() const { return text_; }

private:
    std::string text_;
};

class RecordReader {
public:
    explicit RecordReader(std::string_view text) : text_(text) {}

    bool at_end() const { return pos_ >= text_.size(); }

    std::string peek_key() const {
        if (at_end())
            return {};
        auto end = text_.find('\n', pos_);
        auto line = text_.substr(pos_, end == std::string_view::npos ? std::string_view::npos : end - pos_);
        return std::string(line.substr(0, line.find(',')));
    }

    /// Returns the fields following `key`; throws if the next line has another key.
    std::vector<std::string> next(std::string_view key) {
        if (at_end())
            throw ModelError("model file: unexpected end, expected '" + std::string(key) + "'");
        auto end = text_.find('\n', pos_);
        if (end == std::string_view::npos)
            end = text_.size();
        auto line = text_.substr(pos_, end - pos_);
        pos_ = end + 1;
        ++line_no_;
        auto fields = split(line, ',');
        if (fields.front() != key)
            throw ModelError("model file line " + std::to_string(line_no_) + ": expected '" + std::string(key) +
                             "', found '" + fields.front() + "'");
        fields.erase(fields.begin());
        return fields;
    }

    std::vector<double> numbers(std::string_view key, std::size_t expected_count = npos) {
        auto fields = next(key);
        if (expected_count != npos && fields.size() != expected_count)
            throw ModelError("model file: '" + std::string(key) + "' expects " + std::to_string(expected_count) +
                             " values");
        std::vector<double> out;
        out.reserve(fields.size());
        for (const auto& f : fields)
            out.push_back(to_double(f));
        return out;
    }

    double number(std::string_view key) { return numbers(key, 1).front(); }

    std::size_t count(std::string_view key) {
        auto fields = next(key);
        if (fields.size() != 1)
            throw ModelError("model file: '" + std::string(key) + "' expects one integer");
        return to_size(fields.front());
    }

    static double to_double(std::string_view s) {
        auto v = parse_double(s);
        if (!v)
            throw ModelError("model file: bad number '" + std::string(s) + "'");
        return *v;
    }

    static std::size_t to_size(std::string_view s) {
        auto v = parse_int<std::size_t>(s);
        if (!v)
            throw ModelError("model file: bad integer '" + std::string(s) + "'");
        return *v;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

} // namespace credit
