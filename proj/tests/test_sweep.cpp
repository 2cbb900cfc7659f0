#include <catch2/catch_amalgamated.hpp>

#include "bellfeas/sweep.hpp"

using namespace bellfeas;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

TEST_CASE("sweep spec validation") {
    Scenario scenario;
    CHECK_THROWS_AS(run_sweep({"observable_visibility", 0.9, 0.7, 5, scenario}),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_sweep({"observable_visibility", 0.7, 0.9, 1, scenario}),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_sweep({"warp_factor", 0.7, 0.9, 5, scenario}),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_sweep({"detection.model", 0.0, 1.0, 3, scenario}),
                    std::invalid_argument);
}

TEST_CASE("two steps give exactly the two endpoints") {
    SweepResult r = run_sweep({"observable_visibility", 0.72, 0.95, 2, Scenario{}});
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].value == 0.72);
    CHECK(r.rows[1].value == 0.95);
}

TEST_CASE("observable visibility sweep hits the design row") {
    // 224 points spaced 0.001 from 0.726, so 0.749 lands on the grid
    SweepResult r = run_sweep({"observable_visibility", 0.726, 0.949, 224, Scenario{}});
    bool found = false;
    for (const auto& row : r.rows) {
        if (std::fabs(row.value - 0.749) < 1e-12) {
            found = true;
            REQUIRE(row.n_required.has_value());
            CHECK(*row.n_required == 2604);
            CHECK_THAT(row.s, WithinAbs(2.1184919164349, 1e-12));
        }
    }
    CHECK(found);
}

TEST_CASE("p_d sweep reproduces the ionization design row") {
    Scenario scenario;
    scenario.detection.model = "ionization";
    scenario.detection.a_stirap = 1.0; // contrast carried entirely by the visibility
    scenario.chsh.atom_atom_visibility = 0.826;
    SweepResult r = run_sweep({"p_d", 0.85, 1.0, 7, scenario});
    REQUIRE(r.rows.size() == 7);

    const SweepRow& row = r.rows[4]; // 0.85 + 4 * 0.025 = 0.95
    CHECK_THAT(row.value, WithinAbs(0.95, 1e-12));
    REQUIRE(row.n_required.has_value());
    CHECK(*row.n_required == 3464);
    CHECK_THAT(row.s, WithinAbs(2.10349342654892, 1e-12));

    SECTION("the curve diverges gracefully at low p_d") {
        CHECK_FALSE(r.rows[0].n_required.has_value()); // S <= 2 at 0.85
        CHECK(r.rows[0].s < 2.0);
    }
}

TEST_CASE("scenario-key sweep recomputes the chain per row") {
    SweepResult r = run_sweep({"budget.e_bsm", 0.0, 0.06, 3, Scenario{}});
    REQUIRE(r.rows.size() == 3);
    // more interference mismatch, weaker violation, more events
    CHECK(r.rows[0].s > r.rows[1].s);
    CHECK(r.rows[1].s > r.rows[2].s);
    REQUIRE(r.rows[0].n_required.has_value());
    REQUIRE(r.rows[2].n_required.has_value());
    CHECK(*r.rows[0].n_required < *r.rows[2].n_required);
}

TEST_CASE("required events fall monotonically along both design sweeps") {
    SweepResult fig2 = run_sweep({"observable_visibility", 0.72, 0.95, 24, Scenario{}});
    std::uint64_t prev = UINT64_MAX;
    for (const auto& row : fig2.rows) {
        REQUIRE(row.n_required.has_value());
        CHECK(*row.n_required < prev);
        prev = *row.n_required;
    }

    Scenario ion;
    ion.detection.model = "ionization";
    ion.detection.a_stirap = 1.0;
    ion.chsh.atom_atom_visibility = 0.826;
    SweepResult fig3 = run_sweep({"p_d", 0.85, 1.0, 16, ion});
    prev = UINT64_MAX;
    for (const auto& row : fig3.rows) {
        if (!row.n_required) continue; // flagged, not fatal
        CHECK(*row.n_required < prev);
        prev = *row.n_required;
    }
}

TEST_CASE("csv output is stable and well formed") {
    SweepSpec spec{"observable_visibility", 0.72, 0.95, 6, Scenario{}};
    std::string a = to_csv(run_sweep(spec));
    std::string b = to_csv(run_sweep(spec));
    CHECK(a == b);
    CHECK_THAT(a, ContainsSubstring("observable_visibility,s,delta_s_coefficient,"
                                    "n_required,status\n"));
    CHECK(a.find("\r") == std::string::npos);
    CHECK(a.back() == '\n');

    Scenario ion;
    ion.detection.model = "ionization";
    ion.chsh.atom_atom_visibility = 0.7;
    std::string with_flags = to_csv(run_sweep({"p_d", 0.85, 1.0, 4, ion}));
    CHECK_THAT(with_flags, ContainsSubstring(",no_violation\n"));
}
