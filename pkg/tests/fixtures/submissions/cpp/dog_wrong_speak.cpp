#include <string>
struct Animal {
    virtual ~Animal() {}
};
struct Dog : Animal {
    std::string name;
    int speak() { return 1; }
};
