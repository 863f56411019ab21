#ifndef UTURN_RENDER_HPP
#define UTURN_RENDER_HPP

// Linearized two-column rendering of a replay: at each program point the IL
// assertion appears in square brackets (read top-down) and the replayed SIL
// assertion in angle brackets (read bottom-up).

#include <string>
#include <vector>

#include "uturn/assertions.hpp"
#include "uturn/il.hpp"
#include "uturn/state.hpp"
#include "uturn/uturn.hpp"

namespace uturn {

namespace detail {

class UTurnRenderer {
public:
  UTurnRenderer(const UTurnDerivation& ud, const Universe& u) : ud_(ud), u_(u) {}

  std::string render() {
    const ILDerivation& root = *ud_.il;
    walk(*ud_.root, 0);
    pair(extension(root.triple.post, u_), extension(ud_.root->sil_post, u_), 0);
    std::string joined;
    for (const auto& l : lines_) joined += l + "\n";
    return joined;
  }

private:
  void pair(const StateSet& il, const StateSet& sil, int depth) {
    std::string line = indent(depth) + "[ " + describe(il, u_) + " ]   < " + describe(sil, u_) + " >";
    if (!lines_.empty() && lines_.back() == line) return;  // dedup seam assertions
    lines_.push_back(line);
  }

  void text(const std::string& s, int depth) { lines_.push_back(indent(depth) + s); }

  static std::string indent(int depth) { return std::string(static_cast<std::size_t>(depth) * 2, ' '); }

  void walk(const UTurnNode& n, int depth) {
    const ILDerivation* e = resolve_il(*ud_.il, n.il_path);
    pair(extension(e->triple.pre, u_), extension(n.sil_pre, u_), depth);
    switch (n.rule) {
      case URule::Seq:
        walk(*n.children[0], depth);
        walk(*n.children[1], depth);
        return;
      case URule::Disj:
        text("either:", depth);
        walk(*n.children[0], depth + 1);
        text("or:", depth);
        walk(*n.children[1], depth + 1);
        return;
      case URule::ChoiceL:
        text("choice (left):", depth);
        walk(*n.children[0], depth + 1);
        return;
      case URule::ChoiceR:
        text("choice (right):", depth);
        walk(*n.children[0], depth + 1);
        return;
      case URule::Unroll:
        text("unroll:", depth);
        walk(*n.children[0], depth + 1);
        return;
      case URule::ConsIL:
      case URule::ConsSIL:
        walk(*n.children[0], depth);
        return;
      case URule::Iter0:
        text("iter (0 passes)", depth);
        return;
      case URule::ErId:
        text("(er states pass through)", depth);
        return;
      case URule::Empty:
        text("(empty)", depth);
        return;
      default:  // atom leaves
        text(to_string(*e->triple.cmd), depth);
        return;
    }
  }

  const UTurnDerivation& ud_;
  const Universe& u_;
  std::vector<std::string> lines_;
};

}  // namespace detail

/// Renders a checked replay tree as an indented two-column listing.
inline std::string render_uturn(const UTurnDerivation& ud, const Universe& u) {
  return detail::UTurnRenderer(ud, u).render();
}

}  // namespace uturn

#endif
