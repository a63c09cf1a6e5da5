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
#include "metaspec/config.hpp"

#include <charconv>
#include <cmath>

namespace metaspec
{
    ParseError::ParseError(int line, const std::string &message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line)
    {
    }

    std::string trim(const std::string &text)
    {
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first == std::string::npos)
            return {};
        const auto last = text.find_last_not_of(" \t\r\n");
        return text.substr(first, last - first + 1);
    }

    std::vector<std::string> split(const std::string &text, char separator)
    {
        std::vector<std::string> parts;
        std::string::size_type start = 0;
        while (true)
        {
            const auto pos = text.find(separator, start);
            parts.push_back(trim(text.substr(start, pos - start)));
            if (pos == std::string::npos)
                break;
            start = pos + 1;
        }
        return parts;
    }

    std::vector<KeyValue> parse_key_values(std::istream &in)
    {
        std::vector<KeyValue> entries;
        std::string raw;
        int line = 0;
        while (std::getline(in, raw))
        {
            ++line;
            if (const auto hash = raw.find('#'); hash != std::string::npos)
                raw.erase(hash);
            const std::string text = trim(raw);
            if (text.empty())
                continue;
            const auto eq = text.find('=');
            if (eq == std::string::npos)
                throw ParseError(line, "expected 'key = value', got '" + text + "'");
            KeyValue kv{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line};
            if (kv.key.empty())
                throw ParseError(line, "empty key");
            entries.push_back(std::move(kv));
        }
        return entries;
    }

    double parse_double(const std::string &text, int line)
    {
        const std::string t = trim(text);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
        if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
            throw ParseError(line, "not a number: '" + t + "'");
        if (!std::isfinite(value))
            throw ParseError(line, "non-finite number: '" + t + "'");
        return value;
    }

    double parse_double(const KeyValue &kv) { return parse_double(kv.value, kv.line); }

    long long parse_int(const KeyValue &kv)
    {
        long long value = 0;
        const auto &t = kv.value;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
        if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
            throw ParseError(kv.line, "not an integer for '" + kv.key + "': '" + t + "'");
        return value;
    }

    std::uint64_t parse_u64(const KeyValue &kv)
    {
        std::uint64_t value = 0;
        const auto &t = kv.value;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
        if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
            throw ParseError(kv.line, "not an unsigned integer for '" + kv.key + "': '" + t + "'");
        return value;
    }

    bool parse_bool(const KeyValue &kv)
    {
        if (kv.value == "true" || kv.value == "1" || kv.value == "yes" || kv.value == "on")
            return true;
        if (kv.value == "false" || kv.value == "0" || kv.value == "no" || kv.value == "off")
            return false;
        throw ParseError(kv.line, "not a boolean for '" + kv.key + "': '" + kv.value + "'");
    }

    std::map<std::string, KeyValue> last_values(const std::vector<KeyValue> &entries)
    {
        std::map<std::string, KeyValue> out;
        for (const auto &kv : entries)
            out[kv.key] = kv;
        return out;
    }
}
