#pragma once

// Umbrella header.

#include "beetle/baselines/baselines.hpp"
#include "beetle/bellwether/beetle.hpp"
#include "beetle/bellwether/discovery.hpp"
#include "beetle/core/csv.hpp"
#include "beetle/core/dataset.hpp"
#include "beetle/core/error.hpp"
#include "beetle/core/manifest.hpp"
#include "beetle/core/random.hpp"
#include "beetle/core/sampling.hpp"
#include "beetle/harness/parallel.hpp"
#include "beetle/harness/report.hpp"
#include "beetle/harness/svg.hpp"
#include "beetle/harness/synthetic.hpp"
#include "beetle/harness/workflows.hpp"
#include "beetle/learners/correlation.hpp"
#include "beetle/learners/gaussian_process.hpp"
#include "beetle/learners/linear_map.hpp"
#include "beetle/learners/model.hpp"
#include "beetle/learners/regression_tree.hpp"
#include "beetle/metrics/metrics.hpp"
#include "beetle/stats/a12.hpp"
#include "beetle/stats/bootstrap.hpp"
#include "beetle/stats/scott_knott.hpp"
#include "beetle/stats/summary.hpp"
#include "beetle/stats/yeo_johnson.hpp"
