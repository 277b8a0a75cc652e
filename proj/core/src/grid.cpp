#include "spadnet/grid.hpp"

namespace spadnet {

Extent3 extent_of(const FrameStack& frames) {
  if (frames.empty()) return {};
  const int h = frames.front().height();
  const int w = frames.front().width();
  for (const auto& f : frames) {
    if (f.height() != h || f.width() != w) {
      throw ShapeError("frames in a sequence must share one height x width");
    }
  }
  return {static_cast<int>(frames.size()), h, w};
}

}  // namespace spadnet
