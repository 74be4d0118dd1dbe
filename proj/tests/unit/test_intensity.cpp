#include "doctest.h"
TEST_SUITE("intensity") {}
