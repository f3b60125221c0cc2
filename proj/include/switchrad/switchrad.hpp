#pragma once

#include "switchrad/diophantine.hpp"
#include "switchrad/error.hpp"
#include "switchrad/exact_radius.hpp"
#include "switchrad/io.hpp"
#include "switchrad/matrix.hpp"
#include "switchrad/product_search.hpp"
#include "switchrad/sphere.hpp"
#include "switchrad/version.hpp"
