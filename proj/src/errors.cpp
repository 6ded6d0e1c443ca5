#include "eqlab/errors.hpp"
