#pragma once

#include "classifiers/classifier.hpp"
#include "dataset.hpp"
#include "discretize.hpp"
#include "evaluate.hpp"
#include "imbalance.hpp"
#include "metrics.hpp"
#include "persist.hpp"
#include "pipeline.hpp"
#include "rank.hpp"
#include "scorecard.hpp"
#include "synth.hpp"
