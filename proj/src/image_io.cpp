#include "namecard/image_io.hpp"

#include <opencv2/imgcodecs.hpp>

#include <stdexcept>

namespace namecard {

ImageBuffer read_image(const std::filesystem::path& path) {
    cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) {
        throw std::runtime_error("cannot decode image: " + path.string());
    }
    ImageBuffer img(bgr.rows, bgr.cols);
    for (int row = 0; row < bgr.rows; ++row) {
        const auto* src = bgr.ptr<cv::Vec3b>(row);
        for (int col = 0; col < bgr.cols; ++col) {
            img.at(row, col, 0) = src[col][2];
            img.at(row, col, 1) = src[col][1];
            img.at(row, col, 2) = src[col][0];
        }
    }
    return img;
}

void write_png(const std::filesystem::path& path, const ImageBuffer& img) {
    cv::Mat bgr(img.height, img.width, CV_8UC3);
    for (int row = 0; row < img.height; ++row) {
        auto* dst = bgr.ptr<cv::Vec3b>(row);
        for (int col = 0; col < img.width; ++col) {
            dst[col][2] = img.at(row, col, 0);
            dst[col][1] = img.at(row, col, 1);
            dst[col][0] = img.at(row, col, 2);
        }
    }
    if (!cv::imwrite(path.string(), bgr, {cv::IMWRITE_PNG_COMPRESSION, 6})) {
        throw std::runtime_error("cannot write PNG: " + path.string());
    }
}

}  // namespace namecard
