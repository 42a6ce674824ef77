#pragma once

#include "basis.hpp"
#include "christoffel.hpp"
#include "contour.hpp"
#include "eigen_qr.hpp"
#include "geometry.hpp"
#include "green.hpp"
#include "io.hpp"
#include "lemniscate.hpp"
#include "moments.hpp"
#include "quadrature.hpp"
#include "scalar.hpp"
#include "svg.hpp"
#include "zeros.hpp"
