#include <deque>
#include <iostream>
#include <string>
using namespace std;

bool palindrome(string s) {
  deque<char> d;
  for (int i = 0; i < s.size(); i++) {
    d.push_back(s[i]);
  }
  while (d.size() > 1) {
    if (d.front() != d.back()) {
      return false;
    }
    d.pop_front();
    d.pop_back();
  }
  return true;
}

int main() {
  cout << palindrome("racecar") << palindrome("level") << palindrome("stack") << endl;
  return 0;
}
