#pragma once

// JSON forms of the library's values. Rationals are always "p/q" strings.

#include <nlohmann/json.hpp>

#include "qmrpm/chain_bayes.hpp"
#include "qmrpm/kernels.hpp"
#include "qmrpm/measure.hpp"
#include "qmrpm/models.hpp"
#include "qmrpm/ntr.hpp"
#include "qmrpm/regions.hpp"
#include "qmrpm/report.hpp"

namespace qmrpm::json {

using Json = nlohmann::ordered_json;

Json rational(const Rational& v);
/// Accepts "p/q" strings and integers. ValidationError otherwise.
Rational rational(const Json& j);
std::vector<Rational> rationals(const Json& j);

/// Array of atom labels.
Json region(const RegionSet& r);
RegionSet region(const SampleSpace& space, const Json& j);

/// {"label": "p/q", ...}; atoms not listed get weight zero.
Json measure(const Measure& m);
Measure measure(const SampleSpace& space, const Json& j);

/// {"model": "dirichlet" | "empirical-fixed" | "empirical-dirichlet", "alpha": {...} | null,
///  "p0": {...} | null, "N": int}
Json model(const RpmModel& m);
RpmModel model(const SampleSpace& space, const Json& j);

/// {"variant": "grid", "source": [...], "target": [...], "rows": {"z1": [...], ...}},
/// {"variant": "beta", "a": "p/q", "b": "p/q"}, {"variant": "beta-chain", "factors": [...]},
/// {"variant": "identity"}, {"variant": "increment", "support": [...], "probs": [...]}.
Json kernel(const Kernel& k);
Kernel kernel(const Json& j);

/// {"support": [...], "probs": [...]}
Json increment_law(const IncrementLaw& f);
IncrementLaw increment_law(const Json& j);

/// [{"pair": [B1, B2], "support": [...], "probs": [...]}, ...]
Json f_system(const FSystem& fs);
FSystem f_system(const SampleSpace& space, const Json& j);

/// {"grid": [...], "initial": {"z": "p", ...}, "kernels": [{"y": {"z": "p", ...}, ...}, ...]}
Json chain_spec(const ChainSpec& c);
ChainSpec chain_spec(const Json& j);

/// [{"support": [...], "probs": [...]}, ...]
Json neutral_vector(const NeutralVector& nv);
NeutralVector neutral_vector(const Json& j);

/// {"increments": [{"support": [...], "probs": [...]}, ...]}
NtrChainPrior ntr_prior(const Json& j);

/// {check, inputs, pass, max_discrepancy, witnesses, comparisons[, max_abs_z][, wall_time_ms]}
Json report(const CheckReport& r, bool with_timing = false);

}  // namespace qmrpm::json
