#include <string>
struct Animal {
    virtual ~Animal() {}
};
