#pragma once

#include "sharp/error.hpp"
#include "sharp/linalg.hpp"
#include "sharp/random.hpp"
#include "sharp/sectors.hpp"
#include "sharp/statespace.hpp"
#include "sharp/sampling.hpp"
#include "sharp/spectral.hpp"
#include "sharp/channels.hpp"
#include "sharp/purification.hpp"
#include "sharp/entropy.hpp"
#include "sharp/thermo.hpp"
#include "sharp/io.hpp"
#include "sharp/oracle.hpp"
#include "sharp/suites.hpp"
