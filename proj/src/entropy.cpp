/*
 * Copyright (C) 2026 The Obfuscan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "obfuscan/entropy.hpp"

#include <array>
#include <cmath>

namespace obfuscan {

double shannon_entropy(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) return 0.0;
  std::array<std::size_t, 256> hist{};
  for (std::uint8_t b : bytes) ++hist[b];
  const double n = static_cast<double>(bytes.size());
  double h = 0.0;
  for (std::size_t c : hist) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  // Rounding can push the sum a hair past the theoretical bound.
  if (h < 0.0) h = 0.0;
  if (h > 8.0) h = 8.0;
  return h;
}

double file_entropy(std::span<const std::uint8_t> bytes) {
  if (bytes.size() > kEntropyWindowBytes) bytes = bytes.first(kEntropyWindowBytes);
  return shannon_entropy(bytes);
}

}  // namespace obfuscan
