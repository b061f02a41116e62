#pragma once

#include "sgpt/bessel.hpp"
#include "sgpt/config.hpp"
#include "sgpt/cutoff.hpp"
#include "sgpt/errors.hpp"
#include "sgpt/field.hpp"
#include "sgpt/interacting.hpp"
#include "sgpt/lightcone.hpp"
#include "sgpt/model.hpp"
#include "sgpt/parallel.hpp"
#include "sgpt/propagators.hpp"
#include "sgpt/quadrature.hpp"
#include "sgpt/rng.hpp"
#include "sgpt/series.hpp"
#include "sgpt/spacetime.hpp"
#include "sgpt/verify.hpp"
#include "sgpt/vertex_kernels.hpp"

namespace sgpt {

inline constexpr const char* version = "0.1.0";

} // namespace sgpt
