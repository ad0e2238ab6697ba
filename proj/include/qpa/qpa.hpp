#pragma once

#include "qpa/amplitude.hpp"
#include "qpa/dfa2rpa.hpp"
#include "qpa/error.hpp"
#include "qpa/evolve.hpp"
#include "qpa/json_io.hpp"
#include "qpa/matrixlab.hpp"
#include "qpa/model.hpp"
#include "qpa/wellformed.hpp"
#include "qpa/zoo.hpp"
