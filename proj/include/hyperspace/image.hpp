#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hyperspace {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    bool operator==(const Rgb&) const = default;
};

/// 8-bit RGB raster, rows top to bottom.
class Image {
public:
    Image() = default;
    Image(int width, int height, Rgb fill = {});

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return width_ == 0; }

    Rgb at(int x, int y) const;
    void set(int x, int y, Rgb c);
    /// Ignores coordinates outside the image.
    void blend(int x, int y, Rgb c, double alpha);

    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }

    bool operator==(const Image&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Places two images of equal height side by side.
Image sideBySide(const Image& left, const Image& right);

std::string encodePpm(const Image& image);
Image decodePpm(const std::string& bytes);

void writePpm(const Image& image, const std::string& path);
Image readPpm(const std::string& path);
void writePng(const Image& image, const std::string& path);
/// PNG for *.png, PPM otherwise.
void writeImage(const Image& image, const std::string& path);

}  // namespace hyperspace
