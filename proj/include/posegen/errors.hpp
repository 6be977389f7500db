#pragma once

#include <stdexcept>

namespace posegen {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace posegen
