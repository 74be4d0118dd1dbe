#include "doctest.h"
TEST_SUITE("mcmc") {}
