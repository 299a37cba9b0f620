// Copyright 2026 The invdp Authors
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

#ifndef INVDP_VERSION_H_
#define INVDP_VERSION_H_

namespace invdp {

// Embedded in every report and output file so results can be traced back to
// the code that produced them.
inline constexpr char kVersion[] = "invdp-0.1.0";

}  // namespace invdp

#endif  // INVDP_VERSION_H_
