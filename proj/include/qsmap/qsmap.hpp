#ifndef QSMAP_QSMAP_HPP
#define QSMAP_QSMAP_HPP

#include "qsmap/between.hpp"
#include "qsmap/distortion.hpp"
#include "qsmap/error.hpp"
#include "qsmap/generate.hpp"
#include "qsmap/io.hpp"
#include "qsmap/modulus.hpp"
#include "qsmap/numeric.hpp"
#include "qsmap/preserve.hpp"
#include "qsmap/quasisymmetry.hpp"
#include "qsmap/space.hpp"
#include "qsmap/triangle.hpp"
#include "qsmap/weaksim.hpp"

#endif  // QSMAP_QSMAP_HPP
