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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace obfuscan {

/// Shannon entropy in bits per byte, in [0, 8]. Empty input yields 0.
double shannon_entropy(std::span<const std::uint8_t> bytes);

/// Bytes of a file considered when computing its inventory entropy.
inline constexpr std::size_t kEntropyWindowBytes = 64 * 1024;

/// Entropy of at most the first kEntropyWindowBytes of the input.
double file_entropy(std::span<const std::uint8_t> bytes);

}  // namespace obfuscan
