#include <iostream>
using namespace std;

int fib(int n) {
  if (n < 2) {
    return n;
  }
  return fib(n - 1) + fib(n - 2);
}

int gcd(int a, int b) {
  if (b == 0) {
    return a;
  }
  return gcd(b, a % b);
}

long long power(long long base, int e) {
  if (e == 0) {
    return 1;
  }
  long long half = power(base, e / 2);
  if (e % 2 == 0) {
    return half * half;
  }
  return half * half * base;
}

void countdown(int n) {
  if (n == 0) {
    cout << "liftoff" << endl;
    return;
  }
  cout << n << " ";
  countdown(n - 1);
}

int main() {
  cout << fib(10) << endl;
  cout << gcd(84, 36) << endl;
  cout << power(3, 13) << endl;
  countdown(4);
  return 0;
}
