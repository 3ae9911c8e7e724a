#pragma once

// Response transformations for treatment-effect, noninferiority and
// conditional-quantile settings.

#include <span>
#include <vector>

#include "iss/common.hpp"
#include "iss/geometry.hpp"

namespace iss {

struct TrialRecord {
    Point covariates;
    int treatment = 0;  // 0 or 1
    double raw_response = 0.0;
    double propensity = 0.5;
};

inline constexpr double kRandomisedPropensity = 0.5;

/// Inverse propensity weighted response (T - π) / (π (1 - π)) · Ỹ.
inline double ipw_transform(int treatment, double raw_response, double propensity) {
    require(propensity > 0.0 && propensity < 1.0, "propensity must lie in (0, 1)");
    require(treatment == 0 || treatment == 1, "treatment must be 0 or 1");
    return (treatment - propensity) / (propensity * (1.0 - propensity)) * raw_response;
}

inline double ipw_transform(const TrialRecord& record) {
    return ipw_transform(record.treatment, record.raw_response, record.propensity);
}

inline double binarize_nonneg(double y) { return y >= 0.0 ? 1.0 : 0.0; }

/// Replace each response by 1{Y > tau}; covariates are unchanged.
inline LabeledSample quantile_binarize(const LabeledSample& data, double tau) {
    LabeledSample out = data;
    for (double& y : out.responses()) {
        y = y > tau ? 1.0 : 0.0;
    }
    return out;
}

/// Apply ipw_transform row-wise; the sample's responses are the raw responses.
inline LabeledSample ipw_sample(const LabeledSample& data, std::span<const int> treatment,
                                std::span<const double> propensity) {
    require(treatment.size() == data.size() && propensity.size() == data.size(),
            "treatment and propensity columns must match the sample size");
    LabeledSample out = data;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.responses()[i] = ipw_transform(treatment[i], data.y(i), propensity[i]);
    }
    return out;
}

inline LabeledSample binarize_nonneg(const LabeledSample& data) {
    LabeledSample out = data;
    for (double& y : out.responses()) {
        y = binarize_nonneg(y);
    }
    return out;
}

}  // namespace iss
