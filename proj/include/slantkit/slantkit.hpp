#pragma once

#include "slantkit/classifier.hpp"
#include "slantkit/distribution.hpp"
#include "slantkit/duality.hpp"
#include "slantkit/errors.hpp"
#include "slantkit/expr.hpp"
#include "slantkit/gallery.hpp"
#include "slantkit/identities.hpp"
#include "slantkit/linalg.hpp"
#include "slantkit/manifest.hpp"
#include "slantkit/parallel.hpp"
#include "slantkit/random.hpp"
#include "slantkit/report.hpp"
#include "slantkit/spec_format.hpp"
#include "slantkit/structure.hpp"
#include "slantkit/tolerances.hpp"
#include "slantkit/verifier.hpp"
#include "slantkit/version.hpp"
