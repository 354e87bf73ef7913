#ifndef ULTRASHIFT_ULTRASHIFT_HPP
#define ULTRASHIFT_ULTRASHIFT_HPP

#include "ultrashift/affine.hpp"
#include "ultrashift/bitstream.hpp"
#include "ultrashift/certify.hpp"
#include "ultrashift/chaos.hpp"
#include "ultrashift/closed_paths.hpp"
#include "ultrashift/diagnostics.hpp"
#include "ultrashift/emitters.hpp"
#include "ultrashift/enumeration.hpp"
#include "ultrashift/family_set.hpp"
#include "ultrashift/index_set.hpp"
#include "ultrashift/io.hpp"
#include "ultrashift/metric.hpp"
#include "ultrashift/path.hpp"
#include "ultrashift/report.hpp"
#include "ultrashift/scrambled.hpp"
#include "ultrashift/ultragraph.hpp"

#endif  // ULTRASHIFT_ULTRASHIFT_HPP
