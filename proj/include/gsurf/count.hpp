// Copyright 2026 The gsurf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

namespace gsurf {

/// Exact integer type for counts that may outgrow 64 bits.
using BigCount = boost::multiprecision::cpp_int;

/// Raised when a 64-bit count would wrap; callers rerun with BigCount.
class CountOverflow : public std::overflow_error {
 public:
  explicit CountOverflow(const std::string& where)
      : std::overflow_error("64-bit count overflow in " + where) {}
};

template <class T>
T checked_add(const T& a, const T& b) {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    T r;
    if (__builtin_add_overflow(a, b, &r)) throw CountOverflow("addition");
    return r;
  } else {
    return a + b;
  }
}

template <class T>
T checked_sub(const T& a, const T& b) {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    T r;
    if (__builtin_sub_overflow(a, b, &r)) throw CountOverflow("subtraction");
    return r;
  } else {
    return a - b;
  }
}

template <class T>
T checked_mul(const T& a, const T& b) {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    T r;
    if (__builtin_mul_overflow(a, b, &r)) throw CountOverflow("multiplication");
    return r;
  } else {
    return a * b;
  }
}

/// a / b, required to be exact.
template <class T>
T exact_div(const T& a, const T& b) {
  if (b == 0 || a % b != 0) {
    throw std::logic_error("inexact division in exact count arithmetic");
  }
  return a / b;
}

template <class T>
std::string count_to_string(const T& value) {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    return std::to_string(value);
  } else {
    return value.str();
  }
}

}  // namespace gsurf
