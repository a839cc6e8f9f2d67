#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hearth/sim.hpp"

namespace hearth {

inline constexpr std::int32_t kBackgroundId = -1;
inline constexpr std::int32_t kWallId = -2;
inline constexpr std::int32_t kFloorId = -3;

struct CameraConfig {
  int width = 256;
  int height = 256;
  double horizontal_fov = 90.0;
  double eye_height = 1.5;
  double near = 0.05;
  double far = 50.0;

  /// Throws hearth::Error when out of range.
  void validate() const;
  /// Pinhole focal length in pixels.
  double focal() const;
};

struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;        ///< row-major, row 0 at the top
  std::vector<std::int32_t> instance;   ///< object id or one of the sentinels
  bool operator==(const Frame&) const = default;
};

/// Renders from the agent's head. cam.eye_height overrides the sim's eye height.
Frame render_egocentric(const EnvState& state, const CameraConfig& cam = {});

/// Instance buffer only (no colour work).
std::vector<std::int32_t> render_instances(const EnvState& state, const CameraConfig& cam);

inline constexpr double kVisibleRange = 10.0;
inline constexpr int kVisibilityResolution = 64;

/// Object id appears in a 64x64 instance render and lies within kVisibleRange of the eye.
bool visible(const EnvState& state, ObjectId id, const CameraConfig& cam = {});

/// 8-bit RGB PNG with fixed encoder settings.
std::string encode_png(const Frame& frame);
/// 16-bit grayscale PNG of the instance buffer, value = id + 3.
std::string encode_instance_png(const Frame& frame);

struct DecodedImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> pixels;  ///< 16-bit samples stored big-endian
};
DecodedImage decode_png(std::span<const std::uint8_t> bytes);
DecodedImage decode_png(const std::string& bytes);

}  // namespace hearth
