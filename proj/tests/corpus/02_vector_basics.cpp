#include <iostream>
#include <vector>
using namespace std;

int main() {
  vector<int> v;
  for (int i = 1; i <= 5; i++) {
    v.push_back(i * i);
  }
  int sum = 0;
  for (int i = 0; i < v.size(); i++) {
    sum += v[i];
  }
  cout << "sum " << sum << endl;
  v[2] = 100;
  v.pop_back();
  cout << "size " << v.size() << " third " << v[2] << endl;
  vector<int> w(4, 7);
  w[0]++;
  w[3] -= 2;
  cout << w[0] << " " << w[1] << " " << w[3] << endl;
  vector<int> primes = {2, 3, 5, 7, 11};
  cout << primes[4] << " " << primes.empty() << endl;
  vector<double> half(3);
  half[1] = 0.5;
  cout << half[0] << " " << half[1] << endl;
  return 0;
}
