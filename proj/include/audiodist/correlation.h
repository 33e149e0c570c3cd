// Copyright 2026 The Audiodist Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AUDIODIST_CORRELATION_H_
#define AUDIODIST_CORRELATION_H_

#include <span>
#include <vector>

namespace audiodist {

// Product-moment correlation. Throws ShapeError on unequal lengths and
// UndefinedCorrelationError for fewer than 3 points or a constant series.
double Pearson(std::span<const double> x, std::span<const double> y);

// 1-based fractional ranks; tied values share the mean of their ranks.
std::vector<double> FractionalRanks(std::span<const double> values);

// Pearson correlation of the fractional ranks.
double Spearman(std::span<const double> x, std::span<const double> y);

}  // namespace audiodist

#endif  // AUDIODIST_CORRELATION_H_
