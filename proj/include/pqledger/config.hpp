// Copyright 2026 The PQLedger Authors
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
//
///////////////////////////////////////////////////////////////////////////////
//
// Flat `key = value` config files with optional `[section]` headers.
// Covers both the benchmark configs (flat) and the scheme-profile files
// (one section per scheme). `#` starts a comment.

#ifndef PQLEDGER_CONFIG_HPP
#define PQLEDGER_CONFIG_HPP

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pqledger/errors.hpp"

namespace pqledger {

class ConfigFile {
public:
    struct Section {
        std::string name; // empty for the top-level (flat) section
        std::vector<std::pair<std::string, std::string>> entries;

        std::optional<std::string> find(std::string_view key) const {
            for (const auto& [k, v] : entries)
                if (k == key) return v;
            return std::nullopt;
        }

        std::string get_string(std::string_view key, std::string fallback = "") const {
            auto v = find(key);
            return v ? *v : std::move(fallback);
        }

        std::uint64_t get_u64(std::string_view key, std::uint64_t fallback) const {
            auto v = find(key);
            if (!v) return fallback;
            std::uint64_t out = 0;
            auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
            if (ec != std::errc() || p != v->data() + v->size())
                fail(Errc::ConfigInvalid,
                     "value of '" + std::string(key) + "' is not an integer: " + *v);
            return out;
        }

        std::uint64_t require_u64(std::string_view key) const {
            if (!find(key))
                fail(Errc::ConfigInvalid, "missing required key '" + std::string(key) + "'");
            return get_u64(key, 0);
        }
    };

    static ConfigFile parse(std::string_view text) {
        ConfigFile cfg;
        cfg.sections_.push_back(Section{});
        std::size_t lineno = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t eol = text.find('\n', pos);
            std::string_view line = text.substr(
                pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
            pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
            ++lineno;

            line = trim(line);
            if (auto hash = line.find('#'); hash != std::string_view::npos)
                line = trim(line.substr(0, hash));
            if (line.empty()) continue;

            if (line.front() == '[') {
                if (line.back() != ']')
                    fail(Errc::ConfigInvalid,
                         "line " + std::to_string(lineno) + ": unterminated section header");
                cfg.sections_.push_back(Section{std::string(trim(line.substr(1, line.size() - 2))), {}});
                continue;
            }

            std::size_t eq = line.find('=');
            if (eq == std::string_view::npos)
                fail(Errc::ConfigInvalid,
                     "line " + std::to_string(lineno) + ": expected key = value");
            std::string key(trim(line.substr(0, eq)));
            std::string value(trim(line.substr(eq + 1)));
            if (key.empty())
                fail(Errc::ConfigInvalid, "line " + std::to_string(lineno) + ": empty key");
            cfg.sections_.back().entries.emplace_back(std::move(key), std::move(value));
        }
        return cfg;
    }

    static ConfigFile load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) fail(Errc::IoFailure, "cannot open " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    const Section& top() const { return sections_.front(); }

    // Named sections in file order, top-level section excluded.
    std::vector<const Section*> named_sections() const {
        std::vector<const Section*> out;
        for (const auto& s : sections_)
            if (!s.name.empty()) out.push_back(&s);
        return out;
    }

private:
    static std::string_view trim(std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
            s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
            s.remove_suffix(1);
        return s;
    }

    std::vector<Section> sections_;
};

} // namespace pqledger

#endif // PQLEDGER_CONFIG_HPP
