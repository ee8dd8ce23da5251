#pragma once

#include "opentrend/learners/boosting.hpp"
#include "opentrend/learners/classifier.hpp"
#include "opentrend/learners/knn.hpp"
#include "opentrend/learners/logistic.hpp"
#include "opentrend/learners/mlp.hpp"
#include "opentrend/learners/model.hpp"
#include "opentrend/learners/naive_bayes.hpp"
#include "opentrend/learners/spec.hpp"
#include "opentrend/learners/standardizer.hpp"
#include "opentrend/learners/tree.hpp"
