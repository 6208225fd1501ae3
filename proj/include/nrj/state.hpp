#pragma once

#include <cstdint>
#include <vector>

namespace nrj {

using ParamVector = std::vector<double>;

// Lifted trans-dimensional state: model indicator k, its parameters, and the
// direction the model indicator is currently travelling. Reversible kernels
// carry nu along unchanged.
struct TransDimState {
  int k = 0;
  ParamVector x;
  int nu = +1;  // in {-1, +1}
};

enum class MoveKind : std::uint8_t { ParamUpdate = 0, SwitchUp = 1, SwitchDown = 2 };

inline const char* move_kind_name(MoveKind m) {
  switch (m) {
    case MoveKind::ParamUpdate: return "param_update";
    case MoveKind::SwitchUp: return "switch_up";
    case MoveKind::SwitchDown: return "switch_down";
  }
  return "?";
}

}  // namespace nrj
