#include "cbseg/imagecore.hpp"

namespace cbseg {

Frame to_grayscale(const Frame& frame) {
    if (frame.channels() != 3)
        throw std::invalid_argument("to_grayscale: input must have 3 channels");
    Frame gray(frame.width(), frame.height(), 1);
    const std::uint8_t* src = frame.data().data();
    std::uint8_t* dst = gray.data().data();
    const std::size_t n = static_cast<std::size_t>(frame.width()) * frame.height();
    for (std::size_t i = 0; i < n; ++i) {
        const double y = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
        int v = static_cast<int>(y + 0.5);
        if (v < 0) v = 0;
        if (v > 255) v = 255;
        dst[i] = static_cast<std::uint8_t>(v);
    }
    return gray;
}

} // namespace cbseg
