template <class T>
T doubler(T x) {
    return x + x;
}
