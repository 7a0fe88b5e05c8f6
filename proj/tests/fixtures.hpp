#pragma once

#include <algorithm>
#include <vector>

#include "netupd/kripke.hpp"

namespace fixture {

using namespace netupd;

// Relabeling example: H -> I, J; I -> K, L; J -> M; K, M labeled a and
// L, N labeled b.
struct Five {
  enum : StateId { H, I, J, K, L, M, N };
  KripkeStructure k;
  Five() {
    std::vector<KState> st(7);
    for (auto& s : st) s.role = KState::Role::Abstract;
    st[K].props = st[M].props = 1;
    st[L].props = st[N].props = 2;
    k = make_kripke(st, {{H, I}, {H, J}, {I, K}, {I, L}, {J, M}, {K, K}, {L, L}, {M, M}, {N, N}},
                    {H});
  }
};

inline KripkeStructure redirect(const KripkeStructure& k, StateId q, std::vector<StateId> succ) {
  KripkeStructure out = k;
  for (StateId t : out.succ[q]) {
    auto& p = out.pred[t];
    p.erase(std::find(p.begin(), p.end(), q));
  }
  std::sort(succ.begin(), succ.end());
  out.succ[q] = succ;
  for (StateId t : succ) {
    out.pred[t].push_back(q);
    std::sort(out.pred[t].begin(), out.pred[t].end());
  }
  return out;
}

}  // namespace fixture
