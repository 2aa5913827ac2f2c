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

#include <catch2/catch_amalgamated.hpp>

#include "pqledger/config.hpp"

using namespace pqledger;

TEST_CASE("flat key = value files parse with comments and whitespace", "[config]") {
    auto cfg = ConfigFile::parse(
        "# benchmark shape\n"
        "accounts = 2000\n"
        "total_txs=1000   # inline comment\n"
        "\n"
        "scheme = falcon-512\n");
    REQUIRE(cfg.top().get_u64("accounts", 0) == 2000);
    REQUIRE(cfg.top().get_u64("total_txs", 0) == 1000);
    REQUIRE(cfg.top().get_string("scheme") == "falcon-512");
    REQUIRE(cfg.top().get_u64("missing", 42) == 42);
}

TEST_CASE("sections collect their own entries in file order", "[config]") {
    auto cfg = ConfigFile::parse(
        "[falcon-512]\n"
        "pk_size = 897\n"
        "sig_size = 666\n"
        "[ecdsa-p256]\n"
        "pk_size = 64\n");
    auto sections = cfg.named_sections();
    REQUIRE(sections.size() == 2);
    REQUIRE(sections[0]->name == "falcon-512");
    REQUIRE(sections[0]->require_u64("pk_size") == 897);
    REQUIRE(sections[1]->name == "ecdsa-p256");
}

TEST_CASE("bad lines are ConfigInvalid", "[config]") {
    REQUIRE_THROWS_AS(ConfigFile::parse("just words\n"), Error);
    REQUIRE_THROWS_AS(ConfigFile::parse("[unterminated\n"), Error);
    auto cfg = ConfigFile::parse("x = notanumber\n");
    REQUIRE_THROWS_AS(cfg.top().get_u64("x", 0), Error);
}

TEST_CASE("missing files are IoFailure", "[config]") {
    try {
        ConfigFile::load("/nonexistent/path.conf");
        FAIL("expected IoFailure");
    } catch (const Error& e) {
        REQUIRE(e.code() == Errc::IoFailure);
    }
}
