#ifndef JSRLAB_JSRLAB_HPP
#define JSRLAB_JSRLAB_HPP

#include "jsrlab/bound_report.hpp"
#include "jsrlab/ellipsoid.hpp"
#include "jsrlab/error.hpp"
#include "jsrlab/harness.hpp"
#include "jsrlab/matrix.hpp"
#include "jsrlab/matset.hpp"
#include "jsrlab/network.hpp"
#include "jsrlab/parallel.hpp"
#include "jsrlab/polytope.hpp"
#include "jsrlab/products.hpp"
#include "jsrlab/sampling.hpp"
#include "jsrlab/simplex.hpp"
#include "jsrlab/spectrum.hpp"
#include "jsrlab/theory.hpp"
#include "jsrlab/training.hpp"

#endif  // JSRLAB_JSRLAB_HPP
