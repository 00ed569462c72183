#include "posefuse/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "posefuse/error.hpp"

namespace posefuse {

Image read_png(const std::string& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw Error(ErrorCode::IoError, "cannot read PNG '" + path + "': " + png.message);
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t channels = color ? 3 : 1;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw Error(ErrorCode::IoError, "cannot decode PNG '" + path + "': " + msg);
  }
  std::vector<double> data(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) data[i] = static_cast<double>(buffer[i]) / 255.0;
  return Image(png.width, png.height, channels, std::move(data));
}

void write_png(const Image& img, const std::string& path) {
  if (img.empty()) throw Error(ErrorCode::InvalidArgument, "cannot write an empty image");
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width());
  png.height = static_cast<png_uint_32>(img.height());
  png.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(img.data().size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    buffer[i] = static_cast<png_byte>(std::lround(img.data()[i] * 255.0));
  }
  if (!png_image_write_to_file(&png, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw Error(ErrorCode::IoError, "cannot write PNG '" + path + "': " + msg);
  }
}

}  // namespace posefuse
