// SPDX-License-Identifier: Apache-2.0
//
// metaspec: RIS-coded compression and recovery of wireless sensing spectra
// Copyright (C) 2026 The metaspec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#ifndef METASPEC_CONFIG_HPP
#define METASPEC_CONFIG_HPP

#include <cstdint>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace metaspec
{
    // Parse failure with the 1-based line number of the offending input line.
    class ParseError : public std::runtime_error
    {
    public:
        ParseError(int line, const std::string &message);
        int line() const { return line_; }

    private:
        int line_;
    };

    struct KeyValue
    {
        std::string key;
        std::string value;
        int line = 0;
    };

    // Reads UTF-8 `key = value` lines. Blank lines and lines starting with '#' are
    // skipped; trailing '#' comments are stripped. Repeated keys are preserved in order.
    std::vector<KeyValue> parse_key_values(std::istream &in);

    std::vector<std::string> split(const std::string &text, char separator);
    std::string trim(const std::string &text);

    double parse_double(const KeyValue &kv);
    double parse_double(const std::string &text, int line);
    long long parse_int(const KeyValue &kv);
    std::uint64_t parse_u64(const KeyValue &kv);
    bool parse_bool(const KeyValue &kv);

    // Flat key -> value view where the last occurrence of a key wins.
    std::map<std::string, KeyValue> last_values(const std::vector<KeyValue> &entries);
}

#endif
