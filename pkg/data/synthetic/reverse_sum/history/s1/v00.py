num = int(input())
rev = 0
while num > 0
    rev = rev * 10 + num % 10
