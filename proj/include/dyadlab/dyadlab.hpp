#pragma once

#include "dyadlab/errors.hpp"
#include "dyadlab/dyadic.hpp"
#include "dyadlab/interval.hpp"
#include "dyadlab/piecewise_linear.hpp"
#include "dyadlab/progression.hpp"
#include "dyadlab/witness.hpp"
#include "dyadlab/gap_sequence.hpp"
#include "dyadlab/sampling.hpp"
#include "dyadlab/json_io.hpp"
#include "dyadlab/universal.hpp"
#include "dyadlab/dense_divergence.hpp"
#include "dyadlab/interior_gap.hpp"
