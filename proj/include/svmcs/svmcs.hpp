#pragma once

#include "svmcs/config.hpp"
#include "svmcs/criterion.hpp"
#include "svmcs/error.hpp"
#include "svmcs/experiment.hpp"
#include "svmcs/geometry.hpp"
#include "svmcs/grid.hpp"
#include "svmcs/io.hpp"
#include "svmcs/kernel.hpp"
#include "svmcs/kernel_cache.hpp"
#include "svmcs/log.hpp"
#include "svmcs/nnls.hpp"
#include "svmcs/parallel.hpp"
#include "svmcs/refine.hpp"
#include "svmcs/sequences.hpp"
#include "svmcs/serialize.hpp"
#include "svmcs/smo.hpp"
#include "svmcs/stats.hpp"
#include "svmcs/svm.hpp"
#include "svmcs/synthetic.hpp"
#include "svmcs/tuning.hpp"
