#include <catch2/catch_amalgamated.hpp>

#include "bellfeas/swap_chain.hpp"

#include "oracle_helpers.hpp"

using namespace bellfeas;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const ErrorBudget kDesignBudget{0.005, 0.01, 0.03};
const LinkModel kDesignLink{0.78e-3, 1.2e-3, 50.0, 40e-9};

} // namespace

TEST_CASE("atom-photon visibility from preparation and fiber errors") {
    CHECK_THAT(atom_photon_visibility(kDesignBudget).value(), WithinAbs(0.98505, 1e-15));
    CHECK_THAT(atom_photon_visibility({0.0, 0.0, 0.0}).value(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(atom_photon_visibility({1.0, 0.0, 0.0}).value(), WithinAbs(0.0, 1e-15));
    CHECK_THROWS_AS(atom_photon_visibility({1.5, 0.0, 0.0}), std::domain_error);
}

TEST_CASE("swap fidelity") {
    CHECK_THAT(swap_fidelity(Visibility(0.985), 0.03).value(), WithinAbs(0.9558386875, 1e-12));
    CHECK_THAT(swap_fidelity(Visibility(1.0), 0.0).value(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(swap_fidelity(Visibility(0.0), 0.0).value(), WithinAbs(0.25, 1e-15));
}

TEST_CASE("swap fidelity equals the composed route") {
    // direct formula vs squaring, converting, then depolarizing
    for (double v : oracle::linspace(0.0, 1.0, 21)) {
        for (double e : oracle::linspace(0.0, 1.0, 9)) {
            double direct = swap_fidelity(Visibility(v), e).value();
            double composed =
                depolarize(visibility_to_fidelity(Visibility(v * v)), e).value();
            CHECK_THAT(direct, WithinAbs(composed, 1e-12));
        }
    }
}

TEST_CASE("herald statistics at the design link") {
    HeraldStats h = herald_stats(kDesignLink);
    CHECK_THAT(h.p_true, WithinRel(2.34e-7, 1e-12));
    CHECK_THAT(h.p_dark, WithinRel(3.96e-9, 1e-12));
    CHECK_THAT(h.p_double_dark, WithinRel(4e-12, 1e-12));
    CHECK_THAT(h.e_dc, WithinAbs(0.0166414523449319, 1e-15));
    CHECK_THAT(h.dark_fraction(DarkFractionConvention::RatioToTrue),
               WithinAbs(0.0169230769230769, 1e-15));
}

TEST_CASE("herald statistics degenerate input") {
    CHECK_THROWS_AS(herald_stats({0.0, 0.0, 0.0, 40e-9}), std::domain_error);
    CHECK_THROWS_AS(herald_stats({0.5, 0.5, 0.0, 0.0}), std::domain_error);
}

TEST_CASE("dark fraction vanishes with the dark rate") {
    for (double rate : {50.0, 5.0, 0.5, 0.05, 0.0}) {
        HeraldStats h = herald_stats({0.78e-3, 1.2e-3, rate, 40e-9});
        CHECK(h.e_dc >= 0.0);
        CHECK(h.e_dc <= 1.0);
    }
    CHECK_THAT(herald_stats({0.78e-3, 1.2e-3, 0.0, 40e-9}).e_dc, WithinAbs(0.0, 1e-15));
}

TEST_CASE("atom-atom state at the design budget") {
    SECTION("default dark-fraction convention") {
        SwapChainBreakdown chain = swap_chain_breakdown(kDesignBudget, kDesignLink);
        CHECK_THAT(chain.v_at_ph.value(), WithinAbs(0.98505, 1e-12));
        CHECK_THAT(chain.f_swap.value(), WithinAbs(0.95591034806875, 1e-12));
        CHECK_THAT(chain.f_at_at.value(), WithinAbs(0.944162974651569, 1e-12));
        CHECK_THAT(chain.v_at_at.value(), WithinAbs(0.925550632868759, 1e-12));
    }

    SECTION("ratio-to-true convention lands in the same design window") {
        SwapChainBreakdown chain = swap_chain_breakdown(
            kDesignBudget, kDesignLink, DarkFractionConvention::RatioToTrue);
        CHECK_THAT(chain.f_at_at.value(), WithinAbs(0.943964172947586, 1e-12));
        CHECK_THAT(chain.v_at_at.value(), WithinAbs(0.925285563930115, 1e-12));
    }

    SECTION("error-free chain is pure") {
        WernerState s = atom_atom_state({0.0, 0.0, 0.0}, {0.78e-3, 1.2e-3, 0.0, 40e-9});
        CHECK_THAT(s.visibility.value(), WithinAbs(1.0, 1e-15));
        CHECK(s.target_bell_state == BellStateLabel::PsiMinus);
    }

    SECTION("total interference mismatch destroys the state") {
        WernerState s = atom_atom_state({0.005, 0.01, 1.0}, kDesignLink);
        CHECK_THAT(s.visibility.value(), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("atom-atom visibility is monotone in every error knob") {
    auto v_at_at = [](ErrorBudget b, LinkModel l) {
        return atom_atom_state(b, l).visibility.value();
    };
    double base = v_at_at(kDesignBudget, kDesignLink);

    auto worse = [&](ErrorBudget b, LinkModel l) { CHECK(v_at_at(b, l) <= base + 1e-15); };
    auto better = [&](ErrorBudget b, LinkModel l) { CHECK(v_at_at(b, l) >= base - 1e-15); };

    worse({0.02, 0.01, 0.03}, kDesignLink);
    worse({0.005, 0.05, 0.03}, kDesignLink);
    worse({0.005, 0.01, 0.10}, kDesignLink);
    worse(kDesignBudget, {0.78e-3, 1.2e-3, 200.0, 40e-9});
    worse(kDesignBudget, {0.78e-3, 1.2e-3, 50.0, 400e-9});
    better(kDesignBudget, {2 * 0.78e-3, 1.2e-3, 50.0, 40e-9});
    better(kDesignBudget, {0.78e-3, 2 * 1.2e-3, 50.0, 40e-9});

    // dense monotonicity in e_bsm
    double prev = 1.0;
    for (double e : oracle::linspace(0.0, 1.0, 21)) {
        double v = v_at_at({0.005, 0.01, e}, kDesignLink);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
}
