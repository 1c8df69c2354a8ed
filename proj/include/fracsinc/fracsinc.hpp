#ifndef FRACSINC_FRACSINC_HPP
#define FRACSINC_FRACSINC_HPP

#include "fracsinc/error.hpp"
#include "fracsinc/lattice.hpp"
#include "fracsinc/domain.hpp"
#include "fracsinc/quadrature.hpp"
#include "fracsinc/fft.hpp"
#include "fracsinc/kernel.hpp"
#include "fracsinc/kernel_io.hpp"
#include "fracsinc/operator.hpp"
#include "fracsinc/solver.hpp"
#include "fracsinc/rhs.hpp"
#include "fracsinc/norms.hpp"
#include "fracsinc/bench.hpp"

#endif  // FRACSINC_FRACSINC_HPP
