#include "qburst/image.hpp"

#include <cmath>
#include <sstream>

namespace qburst {

Image::Image(int width, int height, int channels, double fill) {
    if (width < 0 || height < 0 || channels <= 0) {
        throw InvalidArgument("image dimensions must be non-negative with at least one channel");
    }
    width_ = width;
    height_ = height;
    channels_ = channels;
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image Image::channel(int c) const {
    Image out(width_, height_, 1);
    for (std::size_t i = 0; i < pixel_count(); ++i) out.data_[i] = data_[i * channels_ + c];
    return out;
}

Image Image::gray() const {
    if (channels_ == 1) return *this;
    Image out(width_, height_, 1);
    for (std::size_t i = 0; i < pixel_count(); ++i) {
        double sum = 0.0;
        for (int c = 0; c < channels_; ++c) sum += data_[i * channels_ + c];
        out.data_[i] = sum / channels_;
    }
    return out;
}

SrgbImage SrgbImage::from(Image img) {
    if (img.channels() != 1 && img.channels() != 3) {
        throw InvalidArgument("sRGB image must have 1 or 3 channels, got " +
                              std::to_string(img.channels()));
    }
    const auto data = img.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double v = data[i];
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            const auto px = i / img.channels();
            std::ostringstream msg;
            msg << "sRGB value out of [0,1] at pixel (" << px % img.width() << ", "
                << px / img.width() << ") channel " << i % img.channels() << ": " << v;
            throw InvalidArgument(msg.str());
        }
    }
    return SrgbImage{std::move(img)};
}

}  // namespace qburst
