#pragma once

#include <gtest/gtest.h>

#include "isozonoid/core.hpp"

#define EXPECT_CODE(stmt, expected)                                                  \
  do {                                                                               \
    try {                                                                            \
      stmt;                                                                          \
      ADD_FAILURE() << "expected " << isozonoid::to_string(expected) << " from " #stmt; \
    } catch (const isozonoid::Error& e_) {                                           \
      EXPECT_EQ(e_.code(), expected) << e_.what();                                   \
    }                                                                                \
  } while (0)
