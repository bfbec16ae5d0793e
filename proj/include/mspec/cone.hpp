#pragma once

#include "mspec/rational.hpp"

namespace mspec {

// V-representation of a polyhedral cone: cone(rays) + span(lines).
struct ConeGenerators {
    Matrix rays;
    Matrix lines;
};

// Generators of {x in Q^n : ineq x >= 0, eq x = 0} by double description.
// Rays come back primitive-integral and irredundant.
ConeGenerators cone_generators(size_t n, const Matrix& ineq, const Matrix& eq = {});

}  // namespace mspec
