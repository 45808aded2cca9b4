#include <string>
struct Animal {
    virtual ~Animal() {}
};
class Dog : public Animal {
    std::string name;
public:
    std::string speak() { return "Woof"; }
};
