#pragma once

// Satisfaction of causal formulas in a causal Kripke setting.

#include <memory>
#include <string_view>
#include <utility>

#include "causalmk/formula.hpp"
#include "causalmk/model.hpp"

namespace causalmk {

// A model together with a context and the valuation they determine.
class Setting {
 public:
  Setting(Model model, Context context)
      : model_(std::make_shared<const Model>(std::move(model))),
        context_(std::move(context)),
        valuation_(evaluate(*model_, context_)) {}

  Setting(std::shared_ptr<const Model> model, Context context)
      : model_(std::move(model)), context_(std::move(context)), valuation_(evaluate(*model_, context_)) {}

  const Model& model() const { return *model_; }
  const std::shared_ptr<const Model>& model_ptr() const { return model_; }
  const Context& context() const { return context_; }
  const Valuation& valuation() const { return valuation_; }

 private:
  std::shared_ptr<const Model> model_;
  Context context_;
  Valuation valuation_;
};

inline bool satisfies(const Setting& s, std::size_t world, const CompiledFormula& f) {
  return s.model().holds(f, world, s.valuation().values(), s.context().values());
}

// (K, t, world) |= formula. Unknown names raise DanglingRefError.
inline bool satisfies(const Setting& s, std::string_view world, const Formula& formula) {
  return satisfies(s, s.model().world_index(world), s.model().compile(formula));
}

// True iff the formula holds at every world of the setting.
inline bool valid_in_model(const Setting& s, const Formula& formula) {
  CompiledFormula f = s.model().compile(formula);
  for (std::size_t w = 0; w < s.model().world_count(); ++w)
    if (!satisfies(s, w, f)) return false;
  return true;
}

}  // namespace causalmk
