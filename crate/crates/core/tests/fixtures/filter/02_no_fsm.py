import rospy


class Helper(object):
    def __init__(self, robot):
        self.robot = robot

    def speak(self, text):
        self.robot.speech.speak(text)


def main():
    rospy.init_node("helper")
