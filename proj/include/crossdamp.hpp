#ifndef CROSSDAMP_HPP
#define CROSSDAMP_HPP

#include "crossdamp/covariance.hpp"
#include "crossdamp/dynamics.hpp"
#include "crossdamp/entanglement.hpp"
#include "crossdamp/error.hpp"
#include "crossdamp/hypergeometric.hpp"
#include "crossdamp/inference.hpp"
#include "crossdamp/model.hpp"
#include "crossdamp/moments.hpp"
#include "crossdamp/parallel.hpp"
#include "crossdamp/phonon_stats.hpp"

#endif  // CROSSDAMP_HPP
