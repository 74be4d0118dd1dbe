#include "doctest.h"
TEST_SUITE("ctmc") {}
