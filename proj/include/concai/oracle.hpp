#pragma once

#include "concai/analyses.hpp"
#include "concai/traces.hpp"

namespace concai {

/// Sorting/uniqueness order for concrete values (integers before thread ids).
bool concrete_less(const ConcreteVal& a, const ConcreteVal& b);

/// Membership of a concrete value in the concretization of an abstract one.
/// Thread ids are only covered by Top (token identities are not tracked).
bool concrete_in_gamma(const ConcreteVal& v, const ValueD& d);

/// Reject programs that read a global no thread ever writes.
void validate_oracle_input(const Cfg& cfg);

struct ConcreteEnumeration {
    // per read site (parallel to read_sites): values actually read across all
    // enumerated traces whose last action is that read
    std::vector<std::vector<ConcreteVal>> reads;
    std::size_t trace_count = 0;
    bool truncated = false; // some trace stopped at the per-thread event bound
};

ConcreteEnumeration concrete_read_table(const Cfg& cfg, const TraceConfig& conf);

enum class Verdict { Pass, Fail, Inconclusive };
const char* verdict_text(Verdict v);

struct SoundnessWitness {
    std::size_t site = 0;
    ConcreteVal value;
    TracePtr trace;
};

struct SoundnessReport {
    Verdict verdict = Verdict::Pass;
    std::vector<SoundnessWitness> failures;
};

/// concrete ⊆ γ(abstract), site-wise.
SoundnessReport check_soundness(const Cfg& cfg, const TraceConfig& conf,
                                const ConcreteEnumeration& concrete,
                                const ReadTable& abstract_table);

} // namespace concai
