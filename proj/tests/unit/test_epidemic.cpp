#include "doctest.h"
TEST_SUITE("epidemic") {}
