#pragma once

#include <random>

#include <doctest.h>

#include "pspi/coherent.hpp"
#include "pspi/error.hpp"

#define CHECK_THROWS_KIND(expr, error_kind)                   \
  do {                                                        \
    bool thrown_ = false;                                     \
    try {                                                     \
      (void)(expr);                                           \
    } catch (const pspi::Error& e_) {                         \
      thrown_ = true;                                         \
      CHECK(e_.kind() == (error_kind));                       \
    }                                                         \
    CHECK_MESSAGE(thrown_, "expected a pspi::Error");         \
  } while (0)

inline pspi::PhasePoint random_point(std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  const double p = u(rng);
  return {p, u(rng)};
}
