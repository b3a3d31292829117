#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "rexec/config_io.hpp"

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline rexec::ModelSpec bench1() { return rexec::preset("m1-benchmark").spec; }
inline rexec::ModelSpec bench2() { return rexec::preset("m2-benchmark").spec; }

inline rexec::ModelSpec with_prior(rexec::ModelSpec spec, double mean, double precision) {
    spec.prior = {rexec::Schedule(mean), rexec::Schedule(precision)};
    return spec;
}

inline rexec::ModelSpec with_risk1(rexec::ModelSpec spec, double r_xx, double r_xa, double r_aa) {
    spec.risk = rexec::RiskSpecModel1{rexec::Schedule(r_xx), rexec::Schedule(r_xa), rexec::Schedule(r_aa)};
    return spec;
}

inline rexec::ModelSpec with_risk2(rexec::ModelSpec spec, double r_vv, double r_va, double r_aa) {
    spec.risk = rexec::RiskSpecModel2{rexec::Schedule(r_vv), rexec::Schedule(r_va), rexec::Schedule(r_aa)};
    return spec;
}

inline std::string tmp_dir(const std::string& name) { return std::string(REXEC_TEST_TMP) + "/" + name; }
